class SpeakerlyException(Exception):

    def __init__(self, error_message, status_code):
        self.error_dict = {'error_message': error_message,
                           'status_code': status_code}

    def to_dict(self):
        return self.error_dict


class InputOutputException(SpeakerlyException):
    pass


class ValidationException(SpeakerlyException):
    pass


class SignalProcessingException(SpeakerlyException):
    pass


class CodebookException(SpeakerlyException):
    pass


class PredictorTrainingException(SpeakerlyException):
    pass


class RecognitionException(SpeakerlyException):
    pass
